#ifndef SEMFUSE_CLASS_TABLE_HPP
#define SEMFUSE_CLASS_TABLE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace semfuse {

/// CNN class names, display palette, and the merge map onto evaluation
/// classes. kDiscard marks classes whose probability mass is dropped
/// (renormalized away) before map insertion and evaluation.
class ClassTable {
 public:
  static constexpr int kDiscard = -1;

  ClassTable() = default;
  ClassTable(std::vector<std::string> names,
             std::vector<std::array<std::uint8_t, 3>> palette,
             std::vector<int> merge_to,  // cnn class -> eval class or kDiscard
             std::vector<std::string> eval_names);

  int num_classes() const { return static_cast<int>(names_.size()); }
  int num_eval_classes() const { return static_cast<int>(eval_names_.size()); }
  const std::string& name(int c) const { return names_[c]; }
  const std::string& eval_name(int e) const { return eval_names_[e]; }
  const std::array<std::uint8_t, 3>& color(int c) const { return palette_[c]; }
  /// Color of the first CNN class merging into eval class e.
  std::array<std::uint8_t, 3> eval_color(int e) const;
  int merge_target(int c) const { return merge_to_[c]; }
  int index_of(const std::string& name) const;  // -1 when missing

  /// Fold a CNN-class distribution into eval classes; returns the kept mass
  /// (the caller renormalizes / drops on ~0).
  double fold(const double* probs, double* eval_probs) const;

  /// The 12-class table with pole+sign, pedestrian+rider, building+fence
  /// merges and sky/unlabeled discarded (7 evaluation classes).
  static ClassTable default_table();

 private:
  std::vector<std::string> names_;
  std::vector<std::array<std::uint8_t, 3>> palette_;
  std::vector<int> merge_to_;
  std::vector<std::string> eval_names_;
};

}  // namespace semfuse

#endif
