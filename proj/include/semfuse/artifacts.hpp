#ifndef SEMFUSE_ARTIFACTS_HPP
#define SEMFUSE_ARTIFACTS_HPP

#include <string>

#include "semfuse/pipeline.hpp"

namespace semfuse {

/// Write the run outputs under out_dir: per-scan labeled point files, the map
/// snapshot and CSV, metric/confusion/histogram CSVs, the top-down class
/// raster and per-class probability heat layers, and a manifest carrying the
/// config hash and diagnostics. Deterministic byte-for-byte for a fixed run.
void emit_artifacts(const RunResult& result, const RunConfig& cfg,
                    const std::string& out_dir);

/// Top-down raster of the highest occupied voxel per column, colored by
/// argmax class. Empty maps produce a header-only (0 x 0) image.
void write_map_topdown(const SemanticOctree& map, const ClassTable& classes,
                       const std::string& path);

/// Per-class heat layer: column-max probability of the class, 8-bit gray.
void write_class_layer(const SemanticOctree& map, int eval_class,
                       const std::string& path);

void write_map_csv(const SemanticOctree& map, const ClassTable& classes,
                   const std::string& path);

}  // namespace semfuse

#endif
