#pragma once

#include <string>
#include <vector>

#include "repodomain/eval.hpp"
#include "repodomain/stats.hpp"

namespace repodomain {

// Rounding used when printing percentages in reports.
double round_percent_1dp(double percent);
std::int64_t round_percent_int(double percent);

std::string csv_escape(const std::string& field);

// confusion.csv: header row of classes, then K rows of counts.
void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path);
// metrics.csv: metric,class,value (class empty for aggregates).
void write_metrics_csv(const MetricsReport& report, const std::string& path);

std::string format_metrics_text(const MetricsReport& report);
std::string format_confusion_text(const ConfusionMatrix& cm);
std::string format_cv_summary_text(const CrossValidationResult& result);
std::string format_ablation_text(const std::vector<AblationRow>& rows);
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

// profiles.csv: ref,domain plus the nine practice features.
void write_profiles_csv(const std::vector<ClassifiedProfile>& profiles, const std::string& path);
std::vector<ClassifiedProfile> read_profiles_csv(const std::string& path);

// Domain comparison: adoption.csv / refactoring.csv / ownership.csv /
// tests.csv under out_dir, plus a text rendering.
void write_domain_report_csv(const DomainComparisonReport& report, const std::string& out_dir);
std::string format_domain_report_text(const DomainComparisonReport& report);

// tsne.csv: ref,domain,x,y
void write_tsne_csv(const std::vector<ClassifiedProfile>& profiles, const Embedding2D& embedding,
                    const std::string& path);

}  // namespace repodomain
