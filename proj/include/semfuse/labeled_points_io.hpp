#ifndef SEMFUSE_LABELED_POINTS_IO_HPP
#define SEMFUSE_LABELED_POINTS_IO_HPP

#include <string>
#include <vector>

#include "semfuse/occlusion.hpp"

namespace semfuse {

/// Labeled point files: magic "SFLP", u32 c, u32 count, then per point
/// {f32 x,y,z, c x f32 prob, f32 u, f32 v, f32 cov_uu, cov_uv, cov_vv}.
void write_labeled_points(const std::string& path,
                          const std::vector<LabeledPoint>& points, int classes);
std::vector<LabeledPoint> read_labeled_points(const std::string& path,
                                              int* classes = nullptr);

/// CSV inspection export: x,y,z,u,v,cov_uu,cov_uv,cov_vv,p0..p{c-1}.
void write_labeled_points_csv(const std::string& path,
                              const std::vector<LabeledPoint>& points,
                              int classes);

}  // namespace semfuse

#endif
