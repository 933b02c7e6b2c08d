#ifndef SEMFUSE_EVALUATE_HPP
#define SEMFUSE_EVALUATE_HPP

#include <span>
#include <string>
#include <vector>

namespace semfuse {

/// Per-class recall/precision/F1 with the column-normalized (by true label)
/// confusion matrix in percent.
struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::uint64_t>> counts;  // [predicted][true]
  std::vector<double> recall;
  std::vector<double> precision;
  std::vector<double> f1;
  std::vector<double> histogram;  // predicted-class fraction
  double macro_f1 = 0.0;
  std::uint64_t total = 0;

  /// Column-normalized percentages; columns sum to 100 (0 for empty columns).
  std::vector<std::vector<double>> confusion_percent() const;

  /// Text table with one-decimal percent cells.
  std::string format_confusion() const;

  void write_metrics_csv(const std::string& path) const;
  void write_confusion_csv(const std::string& path) const;
  void write_histogram_csv(const std::string& path) const;
};

/// predicted[i] / truth[i] are class ids in [0, class_names.size());
/// ids < 0 drop the pair. Throws MismatchedLength (DataError) when the spans
/// differ in size.
EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth,
                    const std::vector<std::string>& class_names);

}  // namespace semfuse

#endif
