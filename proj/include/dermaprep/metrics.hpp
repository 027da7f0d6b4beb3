#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace dermaprep::metrics {

struct ScoredPrediction {
  std::string item_id;
  std::vector<double> scores;  // one per class, need not sum to 1
  int true_label = 0;          // index into the class list
};

struct PredictionSet {
  std::vector<std::string> classes;
  std::vector<ScoredPrediction> items;

  int class_index(const std::string& name) const;  // -1 when absent
  void validate() const;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0,0) start
};

struct RocCurve {
  std::vector<RocPoint> points;
};

// One-vs-rest sweep over the positive class's score, descending, one point
// per distinct score. Throws when positives or negatives are missing.
RocCurve roc(std::span<const ScoredPrediction> preds, int positive);

// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

// Arithmetic mean of the one-vs-rest AUCs of the given classes.
double mean_auc(std::span<const ScoredPrediction> preds, std::span<const int> classes);

// Specificity (1 - fpr) where the curve first reaches `level`, interpolating
// linearly along the segment that crosses it.
double specificity_at_sensitivity(const RocCurve& curve, double level);

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<long>> counts;  // [true][predicted]

  long total() const;
  long row_sum(std::size_t i) const;
  double sensitivity(std::size_t i) const;
  double specificity(std::size_t i) const;
};

// Argmax of the score vector; ties go to the earlier class.
int predicted_class(const ScoredPrediction& p);
ConfusionMatrix confusion(const PredictionSet& preds);
double accuracy(const ConfusionMatrix& cm);

// CSV: a "# classes: a,b,c" comment, then
// item_id,true_label,score_a,score_b,score_c.
PredictionSet parse_predictions(const std::string& text, const std::string& source = "<predictions>");
PredictionSet read_predictions(const std::filesystem::path& path);
void write_predictions(const PredictionSet& preds, const std::filesystem::path& path);

inline constexpr double kSensitivityLevels[] = {0.82, 0.89, 0.95};

struct ClassEvaluation {
  std::string label;
  RocCurve curve;
  double auc = 0.0;
  std::vector<double> specificity_at;  // aligned with kSensitivityLevels
};

struct EvalReport {
  std::vector<ClassEvaluation> per_class;  // classes with both positives and negatives
  std::vector<std::string> mean_classes;
  double mean_auc = 0.0;
  ConfusionMatrix confusion;
  double accuracy = 0.0;
};

// `mean_classes` names the classes averaged into the headline mean AUC
// (melanoma and seborrheic keratosis for the 3-class task).
EvalReport evaluate(const PredictionSet& preds, const std::vector<std::string>& mean_classes);
void print_report(std::ostream& out, const EvalReport& report);
// roc_<class>.csv, auc.csv, confusion.csv, specificity.csv
void write_report_csv(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace dermaprep::metrics
