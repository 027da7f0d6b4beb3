#include "dermaprep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "dermaprep/csv.hpp"
#include "dermaprep/error.hpp"

namespace dermaprep::metrics {

namespace fs = std::filesystem;

int PredictionSet::class_index(const std::string& name) const {
  const auto it = std::find(classes.begin(), classes.end(), name);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

void PredictionSet::validate() const {
  if (classes.empty()) throw InvalidArgument("prediction set has no classes");
  for (const auto& p : items) {
    if (p.scores.size() != classes.size())
      throw InvalidArgument("item '" + p.item_id + "' has " + std::to_string(p.scores.size()) +
                            " scores for " + std::to_string(classes.size()) + " classes");
    if (p.true_label < 0 || p.true_label >= static_cast<int>(classes.size()))
      throw InvalidArgument("item '" + p.item_id + "' has an out-of-range label");
    for (double s : p.scores)
      if (!std::isfinite(s)) throw InvalidArgument("item '" + p.item_id + "' has a non-finite score");
  }
}

RocCurve roc(std::span<const ScoredPrediction> preds, int positive) {
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(preds.size());
  long pos = 0, neg = 0;
  for (const auto& p : preds) {
    if (positive < 0 || static_cast<std::size_t>(positive) >= p.scores.size())
      throw InvalidArgument("roc: positive class index out of range");
    const bool is_pos = p.true_label == positive;
    scored.emplace_back(p.scores[static_cast<std::size_t>(positive)], is_pos);
    (is_pos ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0)
    throw InvalidArgument("roc: need at least one positive and one negative item");
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve c;
  c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  long tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size();) {
    const double thr = scored[i].first;
    for (; i < scored.size() && scored[i].first == thr; ++i) (scored[i].second ? tp : fp) += 1;
    c.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos, thr});
  }
  return c;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

double mean_auc(std::span<const ScoredPrediction> preds, std::span<const int> classes) {
  if (classes.empty()) throw InvalidArgument("mean_auc: no classes given");
  double sum = 0.0;
  for (int c : classes) sum += auc(roc(preds, c));
  return sum / static_cast<double>(classes.size());
}

double specificity_at_sensitivity(const RocCurve& curve, double level) {
  const auto& pts = curve.points;
  if (pts.empty() || pts.back().tpr < 1.0) throw InvalidArgument("specificity_at_sensitivity: invalid curve");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].tpr < level) continue;
    if (i == 0 || pts[i].tpr == level) return 1.0 - pts[i].fpr;
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    const double t = (level - a.tpr) / (b.tpr - a.tpr);
    return 1.0 - (a.fpr + t * (b.fpr - a.fpr));
  }
  return 1.0 - pts.back().fpr;
}

long ConfusionMatrix::total() const {
  long n = 0;
  for (const auto& row : counts) n += std::accumulate(row.begin(), row.end(), 0L);
  return n;
}

long ConfusionMatrix::row_sum(std::size_t i) const {
  return std::accumulate(counts[i].begin(), counts[i].end(), 0L);
}

double ConfusionMatrix::sensitivity(std::size_t i) const {
  const long r = row_sum(i);
  return r == 0 ? 0.0 : static_cast<double>(counts[i][i]) / static_cast<double>(r);
}

double ConfusionMatrix::specificity(std::size_t i) const {
  long tn = 0, negatives = 0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (t == i) continue;
    negatives += row_sum(t);
    tn += row_sum(t) - counts[t][i];
  }
  return negatives == 0 ? 0.0 : static_cast<double>(tn) / static_cast<double>(negatives);
}

int predicted_class(const ScoredPrediction& p) {
  if (p.scores.empty()) throw InvalidArgument("prediction without scores");
  return static_cast<int>(std::max_element(p.scores.begin(), p.scores.end()) - p.scores.begin());
}

ConfusionMatrix confusion(const PredictionSet& preds) {
  if (preds.items.empty()) throw InvalidArgument("confusion: no predictions");
  preds.validate();
  ConfusionMatrix cm;
  cm.classes = preds.classes;
  cm.counts.assign(preds.classes.size(), std::vector<long>(preds.classes.size(), 0));
  for (const auto& p : preds.items)
    ++cm.counts[static_cast<std::size_t>(p.true_label)][static_cast<std::size_t>(predicted_class(p))];
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const long n = cm.total();
  if (n == 0) throw InvalidArgument("accuracy: empty confusion matrix");
  long diag = 0;
  for (std::size_t i = 0; i < cm.counts.size(); ++i) diag += cm.counts[i][i];
  return static_cast<double>(diag) / static_cast<double>(n);
}

PredictionSet parse_predictions(const std::string& text, const std::string& source) {
  const csv::Table t = csv::parse(text, source);
  PredictionSet ps;
  for (const auto& c : t.comments) {
    std::string s = c;
    const auto colon = s.find(':');
    if (colon == std::string::npos) continue;
    std::string key = s.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key != "classes") continue;
    for (auto name : csv::split_line(s.substr(colon + 1), source, 1)) {
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      if (name.empty()) throw ParseError(source, 1, "empty class name in class list");
      if (ps.class_index(name) >= 0) throw ParseError(source, 1, "duplicate class '" + name + "'");
      ps.classes.push_back(name);
    }
  }
  if (ps.classes.empty()) throw ParseError(source, 1, "missing '# classes: ...' header comment");
  std::vector<std::string> expected{"item_id", "true_label"};
  for (const auto& c : ps.classes) expected.push_back("score_" + c);
  if (t.header != expected) throw ParseError(source, 1, "header must be " + csv::join(expected));

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    ScoredPrediction p;
    p.item_id = f[0];
    p.true_label = ps.class_index(f[1]);
    if (p.true_label < 0) throw ParseError(source, t.row_lines[r], "unknown true_label '" + f[1] + "'");
    for (std::size_t k = 2; k < f.size(); ++k) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(f[k], &used);
        if (used != f[k].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(source, t.row_lines[r], "bad score '" + f[k] + "'");
      }
      if (!std::isfinite(v)) throw ParseError(source, t.row_lines[r], "non-finite score");
      p.scores.push_back(v);
    }
    ps.items.push_back(std::move(p));
  }
  return ps;
}

PredictionSet read_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_predictions(ss.str(), path.string());
}

void write_predictions(const PredictionSet& preds, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# classes: " << csv::join(preds.classes) << "\n";
  std::vector<std::string> header{"item_id", "true_label"};
  for (const auto& c : preds.classes) header.push_back("score_" + c);
  out << csv::join(header) << "\n";
  out << std::setprecision(17);
  for (const auto& p : preds.items) {
    out << csv::escape(p.item_id) << "," << csv::escape(preds.classes[static_cast<std::size_t>(p.true_label)]);
    for (double s : p.scores) out << "," << s;
    out << "\n";
  }
}

EvalReport evaluate(const PredictionSet& preds, const std::vector<std::string>& mean_classes) {
  preds.validate();
  EvalReport rep;
  rep.confusion = confusion(preds);
  rep.accuracy = accuracy(rep.confusion);
  for (std::size_t c = 0; c < preds.classes.size(); ++c) {
    const long positives = rep.confusion.row_sum(c);
    if (positives == 0 || positives == rep.confusion.total()) continue;
    ClassEvaluation ce;
    ce.label = preds.classes[c];
    ce.curve = roc(preds.items, static_cast<int>(c));
    ce.auc = auc(ce.curve);
    for (double level : kSensitivityLevels) ce.specificity_at.push_back(specificity_at_sensitivity(ce.curve, level));
    rep.per_class.push_back(std::move(ce));
  }
  std::vector<int> idx;
  for (const auto& name : mean_classes) {
    const int i = preds.class_index(name);
    if (i < 0) throw ConfigError("mean AUC class '" + name + "' is not in the prediction class list");
    idx.push_back(i);
  }
  rep.mean_classes = mean_classes;
  if (!idx.empty()) rep.mean_auc = mean_auc(preds.items, idx);
  return rep;
}

void print_report(std::ostream& out, const EvalReport& rep) {
  out << std::fixed;
  out << "ROC AUC (one-vs-rest)\n";
  for (const auto& c : rep.per_class)
    out << "  " << std::left << std::setw(24) << c.label << std::setprecision(3) << c.auc << "\n";
  if (!rep.mean_classes.empty()) {
    out << "  mean (";
    for (std::size_t i = 0; i < rep.mean_classes.size(); ++i) out << (i ? " + " : "") << rep.mean_classes[i];
    out << ")  " << std::setprecision(3) << rep.mean_auc << "\n";
  }
  out << "\nconfusion matrix (rows = true, columns = predicted)\n";
  out << "  " << std::setw(24) << "";
  for (const auto& c : rep.confusion.classes) out << std::right << std::setw(22) << c;
  out << "\n";
  for (std::size_t i = 0; i < rep.confusion.classes.size(); ++i) {
    out << "  " << std::left << std::setw(24) << rep.confusion.classes[i];
    for (long v : rep.confusion.counts[i]) out << std::right << std::setw(22) << v;
    out << "\n";
  }
  out << "\naccuracy " << std::setprecision(1) << rep.accuracy * 100.0 << "% ("
      << std::setprecision(0);
  long diag = 0;
  for (std::size_t i = 0; i < rep.confusion.counts.size(); ++i) diag += rep.confusion.counts[i][i];
  out << diag << "/" << rep.confusion.total() << ")\n";
  out << "\nspecificity at sensitivity\n  " << std::left << std::setw(24) << "class";
  for (double level : kSensitivityLevels) out << std::right << std::setw(8) << std::setprecision(0) << level * 100 << "%";
  out << "\n";
  for (const auto& c : rep.per_class) {
    out << "  " << std::left << std::setw(24) << c.label;
    for (double s : c.specificity_at) out << std::right << std::setw(9) << std::setprecision(3) << s;
    out << "\n";
  }
  out << std::defaultfloat;
}

void write_report_csv(const EvalReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + (dir / name).string());
    f << std::setprecision(17);
    return f;
  };
  for (const auto& c : rep.per_class) {
    auto f = open("roc_" + c.label + ".csv");
    f << "fpr,tpr,threshold\n";
    for (const auto& p : c.curve.points)
      f << p.fpr << "," << p.tpr << "," << (std::isinf(p.threshold) ? std::string("inf") : [&] {
        std::ostringstream os;
        os << std::setprecision(17) << p.threshold;
        return os.str();
      }()) << "\n";
  }
  {
    auto f = open("auc.csv");
    f << "class_label,auc\n";
    for (const auto& c : rep.per_class) f << csv::escape(c.label) << "," << c.auc << "\n";
    if (!rep.mean_classes.empty()) f << "mean," << rep.mean_auc << "\n";
    f << "accuracy," << rep.accuracy << "\n";
  }
  {
    auto f = open("confusion.csv");
    f << "true_label";
    for (const auto& c : rep.confusion.classes) f << "," << csv::escape(c);
    f << "\n";
    for (std::size_t i = 0; i < rep.confusion.classes.size(); ++i) {
      f << csv::escape(rep.confusion.classes[i]);
      for (long v : rep.confusion.counts[i]) f << "," << v;
      f << "\n";
    }
  }
  {
    auto f = open("specificity.csv");
    f << "class_label";
    for (double level : kSensitivityLevels) f << ",sens_" << level;
    f << "\n";
    for (const auto& c : rep.per_class) {
      f << csv::escape(c.label);
      for (double s : c.specificity_at) f << "," << s;
      f << "\n";
    }
  }
}

}  // namespace dermaprep::metrics
