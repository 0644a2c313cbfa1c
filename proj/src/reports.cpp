#include "repodomain/reports.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace repodomain {

double round_percent_1dp(double percent) { return std::round(percent * 10.0) / 10.0; }

std::int64_t round_percent_int(double percent) {
    return static_cast<std::int64_t>(std::llround(percent));
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

}  // namespace

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
    auto out = open_out(path);
    for (size_t i = 0; i < cm.classes.size(); ++i) {
        out << (i ? "," : "") << csv_escape(label_display(cm.classes[i]));
    }
    out << "\n";
    for (const auto& row : cm.counts) {
        for (size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << "\n";
    }
}

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "metric,class,value\n";
    for (const auto& m : report.per_class) {
        const std::string cls = csv_escape(label_display(m.label));
        out << "precision," << cls << "," << fmt(m.precision) << "\n";
        out << "recall," << cls << "," << fmt(m.recall) << "\n";
        out << "f1," << cls << "," << fmt(m.f1) << "\n";
    }
    out << "macro_precision,," << fmt(report.macro_precision) << "\n";
    out << "macro_recall,," << fmt(report.macro_recall) << "\n";
    out << "macro_f1,," << fmt(report.macro_f1) << "\n";
    out << "accuracy,," << fmt(report.accuracy) << "\n";
    if (report.roc_auc_ovr) out << "roc_auc_ovr,," << fmt(*report.roc_auc_ovr) << "\n";
    if (report.zero_r_accuracy) out << "zero_r_accuracy,," << fmt(*report.zero_r_accuracy) << "\n";
}

std::string format_metrics_text(const MetricsReport& report) {
    std::ostringstream s;
    s << std::left << std::setw(32) << "Class" << std::right << std::setw(10) << "Precision"
      << std::setw(10) << "Recall" << std::setw(10) << "F1" << "\n";
    for (const auto& m : report.per_class) {
        s << std::left << std::setw(32) << label_display(m.label) << std::right << std::setw(10)
          << fmt(m.precision, 2) << std::setw(10) << fmt(m.recall, 2) << std::setw(10)
          << fmt(m.f1, 2) << "\n";
    }
    s << std::left << std::setw(32) << "macro" << std::right << std::setw(10)
      << fmt(report.macro_precision, 2) << std::setw(10) << fmt(report.macro_recall, 2)
      << std::setw(10) << fmt(report.macro_f1, 2) << "\n";
    s << "accuracy: " << fmt(report.accuracy, 4);
    if (report.roc_auc_ovr) s << "  roc_auc_ovr: " << fmt(*report.roc_auc_ovr, 4);
    if (report.zero_r_accuracy) s << "  zero_r: " << fmt(*report.zero_r_accuracy, 4);
    s << "\n";
    for (const auto& flag : report.flags) s << "note: " << flag << "\n";
    return s.str();
}

std::string format_confusion_text(const ConfusionMatrix& cm) {
    std::ostringstream s;
    s << std::left << std::setw(32) << "true \\ predicted";
    for (const auto& c : cm.classes) s << std::right << std::setw(8) << label_id(c).substr(0, 7);
    s << "\n";
    for (size_t i = 0; i < cm.classes.size(); ++i) {
        s << std::left << std::setw(32) << label_display(cm.classes[i]);
        for (size_t j = 0; j < cm.classes.size(); ++j) {
            s << std::right << std::setw(8) << cm.counts[i][j];
        }
        s << "\n";
    }
    return s.str();
}

std::string format_cv_summary_text(const CrossValidationResult& result) {
    std::ostringstream s;
    auto line = [&](const char* name, const Aggregate& a) {
        s << std::left << std::setw(18) << name << fmt(a.mean, 4) << " +/- " << fmt(a.stddev, 4)
          << "\n";
    };
    s << result.folds.size() << "-fold cross-validation\n";
    line("macro_precision", result.summary.macro_precision);
    line("macro_recall", result.summary.macro_recall);
    line("macro_f1", result.summary.macro_f1);
    line("accuracy", result.summary.accuracy);
    line("roc_auc_ovr", result.summary.roc_auc_ovr);
    line("zero_r", result.summary.zero_r_accuracy);
    for (const auto& w : result.warnings) s << "warning: " << w << "\n";
    return s.str();
}

std::string format_ablation_text(const std::vector<AblationRow>& rows) {
    std::ostringstream s;
    s << std::left << std::setw(44) << "Data Source" << std::right << std::setw(10) << "Precision"
      << std::setw(8) << "Recall" << std::setw(10) << "F1 score" << std::setw(10) << "Accuracy"
      << "\n";
    for (const auto& row : rows) {
        s << std::left << std::setw(44) << row.name << std::right << std::setw(10)
          << fmt(row.summary.macro_precision.mean, 2) << std::setw(8)
          << fmt(row.summary.macro_recall.mean, 2) << std::setw(10)
          << fmt(row.summary.macro_f1.mean, 2) << std::setw(10)
          << fmt(row.summary.accuracy.mean, 2) << "\n";
    }
    return s.str();
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "data_source,macro_precision,macro_recall,macro_f1,accuracy,roc_auc_ovr\n";
    for (const auto& row : rows) {
        out << csv_escape(row.name) << "," << fmt(row.summary.macro_precision.mean) << ","
            << fmt(row.summary.macro_recall.mean) << "," << fmt(row.summary.macro_f1.mean) << ","
            << fmt(row.summary.accuracy.mean) << "," << fmt(row.summary.roc_auc_ovr.mean) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Practice profiles
// ---------------------------------------------------------------------------

void write_profiles_csv(const std::vector<ClassifiedProfile>& profiles, const std::string& path) {
    auto out = open_out(path);
    out << "ref,domain";
    for (const auto& name : PracticeProfile::feature_names()) out << "," << name;
    out << "\n";
    for (const auto& cp : profiles) {
        out << csv_escape(cp.ref.full_name()) << "," << label_id(cp.domain);
        const auto& p = cp.profile;
        out << "," << p.refactoring_commits << "," << p.non_refactoring_commits << ","
            << p.total_commits << "," << fmt(p.refactoring_ratio, 6) << ","
            << p.major_contributors << "," << p.minor_contributors << ","
            << p.total_contributors << "," << fmt(p.ownership_ratio, 6) << ","
            << (p.uses_automation ? 1 : 0) << "\n";
    }
}

std::vector<ClassifiedProfile> read_profiles_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profiles file '" + path + "'");
    std::vector<ClassifiedProfile> profiles;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (fields.size() != 2 + PracticeProfile::feature_names().size()) {
            throw SchemaMismatchError("profiles row has " + std::to_string(fields.size()) +
                                      " fields, expected " +
                                      std::to_string(2 + PracticeProfile::feature_names().size()));
        }
        ClassifiedProfile cp;
        cp.ref = RepoRef::parse(fields[0]);
        cp.domain = label_from_id(fields[1]);
        PracticeProfile& p = cp.profile;
        p.refactoring_commits = std::stoll(fields[2]);
        p.non_refactoring_commits = std::stoll(fields[3]);
        p.total_commits = std::stoll(fields[4]);
        p.refactoring_ratio = std::stod(fields[5]);
        p.major_contributors = std::stoll(fields[6]);
        p.minor_contributors = std::stoll(fields[7]);
        p.total_contributors = std::stoll(fields[8]);
        p.ownership_ratio = std::stod(fields[9]);
        p.uses_automation = fields[10] == "1" || fields[10] == "true";
        profiles.push_back(std::move(cp));
    }
    return profiles;
}

// ---------------------------------------------------------------------------
// Domain comparison report
// ---------------------------------------------------------------------------

void write_domain_report_csv(const DomainComparisonReport& report, const std::string& out_dir) {
    {
        auto out = open_out(out_dir + "/adoption.csv");
        out << "domain,adopted,adopted_percent,not_adopted,not_adopted_percent\n";
        for (const auto& row : report.adoption) {
            out << csv_escape(label_display(row.domain)) << "," << row.adopted << ","
                << fmt(row.adopted_percent, 1) << "," << row.not_adopted << ","
                << fmt(row.not_adopted_percent, 1) << "\n";
        }
        out << "Total," << report.adoption_total.adopted << ","
            << fmt(report.adoption_total.adopted_percent, 1) << ","
            << report.adoption_total.not_adopted << ","
            << fmt(report.adoption_total.not_adopted_percent, 1) << "\n";
    }
    {
        auto out = open_out(out_dir + "/refactoring.csv");
        out << "domain,refactoring,refactoring_percent,non_refactoring,non_refactoring_percent\n";
        for (const auto& row : report.refactoring) {
            out << csv_escape(label_display(row.domain)) << "," << row.refactoring << ","
                << fmt(row.refactoring_percent, 1) << "," << row.non_refactoring << ","
                << fmt(row.non_refactoring_percent, 1) << "\n";
        }
        out << "Total," << report.refactoring_total.refactoring << ","
            << fmt(report.refactoring_total.refactoring_percent, 1) << ","
            << report.refactoring_total.non_refactoring << ","
            << fmt(report.refactoring_total.non_refactoring_percent, 1) << "\n";
    }
    {
        auto out = open_out(out_dir + "/ownership.csv");
        out << "domain,repositories,median_ownership_ratio\n";
        for (const auto& row : report.ownership) {
            out << csv_escape(label_display(row.domain)) << "," << row.repositories << ","
                << fmt(row.median_ownership_ratio, 4) << "\n";
        }
    }
    {
        auto out = open_out(out_dir + "/tests.csv");
        out << "test,domain_a,domain_b,statistic,p,effect,label\n";
        for (const auto& t : report.tests) {
            out << t.test << "," << csv_escape(label_display(t.domain_a)) << ","
                << (t.domain_b ? csv_escape(label_display(*t.domain_b)) : std::string("all_others"))
                << "," << fmt(t.result.statistic, 3) << "," << fmt(t.result.p_value, 6) << ","
                << fmt(t.result.effect_size, 4) << "," << effect_label_name(t.result.effect_label)
                << "\n";
        }
    }
}

std::string format_domain_report_text(const DomainComparisonReport& report) {
    std::ostringstream s;
    s << "GitHub Actions adoption\n";
    s << std::left << std::setw(32) << "Domain" << std::right << std::setw(10) << "Adopted"
      << std::setw(8) << "(%)" << std::setw(14) << "Not adopted" << std::setw(8) << "(%)" << "\n";
    auto adoption_line = [&](const std::string& name, const AdoptionRow& row, bool total) {
        s << std::left << std::setw(32) << name << std::right << std::setw(10) << row.adopted
          << std::setw(8)
          << (total ? fmt(round_percent_1dp(row.adopted_percent), 1)
                    : std::to_string(round_percent_int(row.adopted_percent)))
          << std::setw(14) << row.not_adopted << std::setw(8)
          << (total ? fmt(round_percent_1dp(row.not_adopted_percent), 1)
                    : std::to_string(round_percent_int(row.not_adopted_percent)))
          << "\n";
    };
    for (const auto& row : report.adoption) adoption_line(label_display(row.domain), row, false);
    adoption_line("Total", report.adoption_total, true);

    s << "\nRefactoring commits\n";
    s << std::left << std::setw(32) << "Domain" << std::right << std::setw(12) << "Refactoring"
      << std::setw(8) << "(%)" << std::setw(16) << "Not refactoring" << std::setw(8) << "(%)"
      << "\n";
    for (const auto& row : report.refactoring) {
        s << std::left << std::setw(32) << label_display(row.domain) << std::right << std::setw(12)
          << row.refactoring << std::setw(8) << round_percent_int(row.refactoring_percent)
          << std::setw(16) << row.non_refactoring << std::setw(8)
          << round_percent_int(row.non_refactoring_percent) << "\n";
    }

    s << "\nOwnership ratio medians\n";
    for (const auto& row : report.ownership) {
        s << std::left << std::setw(32) << label_display(row.domain) << "Mdn = "
          << fmt(row.median_ownership_ratio, 2) << "  (n = " << row.repositories << ")\n";
    }

    if (!report.tests.empty()) {
        s << "\nHypothesis tests\n";
        for (const auto& t : report.tests) {
            s << std::left << std::setw(18) << t.test << std::setw(32)
              << label_display(t.domain_a)
              << std::setw(32) << (t.domain_b ? label_display(*t.domain_b) : "all others")
              << " stat = " << fmt(t.result.statistic, 3) << ", p = " << fmt(t.result.p_value, 3)
              << ", effect = " << fmt(t.result.effect_size, 3) << " ("
              << effect_label_name(t.result.effect_label) << ")\n";
        }
    }
    for (const auto& flag : report.flags) s << "note: " << flag << "\n";
    return s.str();
}

void write_tsne_csv(const std::vector<ClassifiedProfile>& profiles, const Embedding2D& embedding,
                    const std::string& path) {
    if (profiles.size() != embedding.points.size()) {
        throw SchemaMismatchError("profile/embedding size mismatch");
    }
    auto out = open_out(path);
    out << "ref,domain,x,y\n";
    for (size_t i = 0; i < profiles.size(); ++i) {
        out << csv_escape(profiles[i].ref.full_name()) << "," << label_id(profiles[i].domain)
            << "," << fmt(embedding.points[i][0], 6) << "," << fmt(embedding.points[i][1], 6)
            << "\n";
    }
}

}  // namespace repodomain
