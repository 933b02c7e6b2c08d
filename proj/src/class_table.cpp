#include "semfuse/class_table.hpp"

#include <stdexcept>

namespace semfuse {

ClassTable::ClassTable(std::vector<std::string> names,
                       std::vector<std::array<std::uint8_t, 3>> palette,
                       std::vector<int> merge_to,
                       std::vector<std::string> eval_names)
    : names_(std::move(names)),
      palette_(std::move(palette)),
      merge_to_(std::move(merge_to)),
      eval_names_(std::move(eval_names)) {
  if (palette_.size() != names_.size() || merge_to_.size() != names_.size())
    throw std::invalid_argument("ClassTable: size mismatch");
  for (int t : merge_to_) {
    if (t != kDiscard && (t < 0 || t >= static_cast<int>(eval_names_.size())))
      throw std::invalid_argument("ClassTable: merge target out of range");
  }
}

std::array<std::uint8_t, 3> ClassTable::eval_color(int e) const {
  for (int c = 0; c < num_classes(); ++c)
    if (merge_to_[c] == e) return palette_[c];
  return {0, 0, 0};
}

int ClassTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

double ClassTable::fold(const double* probs, double* eval_probs) const {
  for (int e = 0; e < num_eval_classes(); ++e) eval_probs[e] = 0.0;
  double kept = 0.0;
  for (int c = 0; c < num_classes(); ++c) {
    const int t = merge_to_[c];
    if (t == kDiscard) continue;
    eval_probs[t] += probs[c];
    kept += probs[c];
  }
  return kept;
}

ClassTable ClassTable::default_table() {
  std::vector<std::string> names = {
      "building", "pole",   "road",       "undrivable_road",
      "vegetation", "vehicle", "pedestrian", "sign",
      "rider",    "fence",  "sky",        "unlabeled"};
  std::vector<std::array<std::uint8_t, 3>> palette = {
      {{255, 255, 255}},  // building: white
      {{0, 255, 255}},    // pole: cyan
      {{128, 64, 0}},     // road: brown
      {{128, 255, 0}},    // undrivable_road: lime
      {{0, 160, 0}},      // vegetation: green
      {{255, 0, 0}},      // vehicle: red
      {{255, 255, 0}},    // pedestrian: yellow
      {{0, 128, 255}},    // sign: light blue
      {{255, 192, 0}},    // rider: amber
      {{128, 128, 128}},  // fence: gray
      {{0, 0, 255}},      // sky: blue
      {{128, 0, 160}},    // unlabeled: purple
  };
  std::vector<std::string> eval_names = {"building",   "pole",    "road",
                                         "undrivable_road", "vegetation",
                                         "vehicle",    "pedestrian"};
  std::vector<int> merge_to = {
      0,  // building
      1,  // pole
      2,  // road
      3,  // undrivable_road
      4,  // vegetation
      5,  // vehicle
      6,  // pedestrian
      1,  // sign -> pole
      6,  // rider -> pedestrian
      0,  // fence -> building
      kDiscard,  // sky
      kDiscard,  // unlabeled
  };
  return ClassTable(std::move(names), std::move(palette), std::move(merge_to),
                    std::move(eval_names));
}

}  // namespace semfuse
