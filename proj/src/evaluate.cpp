#include "semfuse/evaluate.hpp"

#include <cstdio>
#include <fstream>

#include "semfuse/errors.hpp"

namespace semfuse {

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth,
                    const std::vector<std::string>& class_names) {
  if (predicted.size() != truth.size())
    throw DataError("evaluate: predicted/truth length mismatch");
  const int n = static_cast<int>(class_names.size());

  EvalReport r;
  r.class_names = class_names;
  r.counts.assign(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i], t = truth[i];
    if (p < 0 || t < 0) continue;
    if (p >= n || t >= n) throw DataError("evaluate: class id out of range");
    ++r.counts[p][t];
    ++r.total;
  }

  r.recall.assign(n, 0.0);
  r.precision.assign(n, 0.0);
  r.f1.assign(n, 0.0);
  r.histogram.assign(n, 0.0);
  double f1_sum = 0.0;
  for (int c = 0; c < n; ++c) {
    std::uint64_t tp = r.counts[c][c], fp = 0, fn = 0, pred_total = 0;
    for (int o = 0; o < n; ++o) {
      if (o != c) {
        fp += r.counts[c][o];
        fn += r.counts[o][c];
      }
      pred_total += r.counts[c][o];
    }
    r.recall[c] = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    r.precision[c] = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double pr = r.precision[c] + r.recall[c];
    r.f1[c] = pr > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / pr : 0.0;
    r.histogram[c] =
        r.total > 0 ? static_cast<double>(pred_total) / r.total : 0.0;
    f1_sum += r.f1[c];
  }
  r.macro_f1 = n > 0 ? f1_sum / n : 0.0;
  return r;
}

std::vector<std::vector<double>> EvalReport::confusion_percent() const {
  const int n = static_cast<int>(class_names.size());
  std::vector<std::vector<double>> pct(n, std::vector<double>(n, 0.0));
  for (int t = 0; t < n; ++t) {
    std::uint64_t col = 0;
    for (int p = 0; p < n; ++p) col += counts[p][t];
    if (col == 0) continue;
    for (int p = 0; p < n; ++p)
      pct[p][t] = 100.0 * static_cast<double>(counts[p][t]) / col;
  }
  return pct;
}

std::string EvalReport::format_confusion() const {
  const auto pct = confusion_percent();
  const int n = static_cast<int>(class_names.size());
  std::string out = "predicted \\ true";
  for (int t = 0; t < n; ++t) out += "\t" + class_names[t];
  out += "\n";
  char buf[32];
  for (int p = 0; p < n; ++p) {
    out += class_names[p];
    for (int t = 0; t < n; ++t) {
      std::snprintf(buf, sizeof(buf), "\t%.1f", pct[p][t]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void EvalReport::write_metrics_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metrics csv: " + path);
  out << "class,recall,precision,f1\n";
  out.precision(6);
  for (std::size_t c = 0; c < class_names.size(); ++c)
    out << class_names[c] << ',' << recall[c] << ',' << precision[c] << ','
        << f1[c] << "\n";
  out << "macro,," << ',' << macro_f1 << "\n";
}

void EvalReport::write_confusion_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write confusion csv: " + path);
  const auto pct = confusion_percent();
  out << "predicted_true";
  for (const auto& n : class_names) out << ',' << n;
  out << "\n";
  out.precision(6);
  for (std::size_t p = 0; p < class_names.size(); ++p) {
    out << class_names[p];
    for (std::size_t t = 0; t < class_names.size(); ++t) out << ',' << pct[p][t];
    out << "\n";
  }
}

void EvalReport::write_histogram_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write histogram csv: " + path);
  out << "class,fraction\n";
  out.precision(6);
  for (std::size_t c = 0; c < class_names.size(); ++c)
    out << class_names[c] << ',' << histogram[c] << "\n";
}

}  // namespace semfuse
