#include "semfuse/motion_correction.hpp"

#include <cmath>

#include "semfuse/kernels.hpp"

namespace semfuse {

CorrectedPacketSigma correct_packet(const LidarPacket& pk,
                                    const GaussianState& pose,
                                    const RigidTransform& t_veh_ld,
                                    const UTParams& params) {
  if (pose.dim() != 6)
    throw std::invalid_argument("correct_packet: pose must be 6-DoF");
  const SigmaPointSet sp = utd(pose, params);
  const std::size_t m = pk.points.size();

  // Promote the packet once to SoA doubles.
  std::vector<double> xs(m), ys(m), zs(m);
  for (std::size_t j = 0; j < m; ++j) {
    xs[j] = pk.points[j].x;
    ys[j] = pk.points[j].y;
    zs[j] = pk.points[j].z;
  }

  const Eigen::Matrix4d ld_from_veh = t_veh_ld.inverse().matrix();
  const Eigen::Matrix4d veh_from_ld = t_veh_ld.matrix();

  CorrectedPacketSigma out;
  out.wm = sp.wm;
  out.wc = sp.wc;
  out.point_count = m;
  out.sigma.resize(sp.count());

  const auto& k = kernels::active();
  for (int s = 0; s < sp.count(); ++s) {
    const Pose6 p = Pose6::from_vector(sp.points.row(s).transpose());
    const Eigen::Matrix4d sandwich =
        ld_from_veh * pose_to_transform(p).matrix() * veh_from_ld;
    double m3x4[12];
    for (int r = 0; r < 3; ++r)
      for (int ccol = 0; ccol < 4; ++ccol) m3x4[r * 4 + ccol] = sandwich(r, ccol);
    auto& soa = out.sigma[s];
    soa.x.resize(m);
    soa.y.resize(m);
    soa.z.resize(m);
    k.transform_points(m3x4, xs.data(), ys.data(), zs.data(), m, soa.x.data(),
                       soa.y.data(), soa.z.data());
  }
  return out;
}

std::vector<PointGaussian3> recover_corrected_points(
    const CorrectedPacketSigma& c) {
  const int ns = static_cast<int>(c.sigma.size());
  std::vector<PointGaussian3> out(c.point_count);
  const bool negative_wc = (c.wc.array() < 0.0).any();

  for (std::size_t j = 0; j < c.point_count; ++j) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int s = 0; s < ns; ++s) {
      mean += c.wm[s] *
              Eigen::Vector3d(c.sigma[s].x[j], c.sigma[s].y[j], c.sigma[s].z[j]);
    }
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int s = 0; s < ns; ++s) {
      const Eigen::Vector3d d =
          Eigen::Vector3d(c.sigma[s].x[j], c.sigma[s].y[j], c.sigma[s].z[j]) -
          mean;
      cov.noalias() += c.wc[s] * (d * d.transpose());
    }
    cov = 0.5 * (cov + cov.transpose()).eval();
    if (negative_wc) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
      if (es.eigenvalues().minCoeff() < 0.0) {
        const Eigen::Vector3d ev = es.eigenvalues().cwiseMax(0.0);
        cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      }
    }
    out[j] = PointGaussian3{mean, cov};
  }
  return out;
}

std::vector<ProjectedPointGaussian> project_corrected(
    const CorrectedPacketSigma& c, int packet_index,
    const std::vector<PointGaussian3>& recovered,
    const RigidTransform& t_cam_ld, const FisheyeIntrinsics& k,
    ProjectionDiagnostics* diag) {
  const int ns = static_cast<int>(c.sigma.size());
  const Eigen::Matrix3d r = t_cam_ld.rotation();
  const Eigen::Vector3d t = t_cam_ld.trans();

  std::vector<ProjectedPointGaussian> out;
  out.reserve(c.point_count);

  Eigen::Matrix<double, Eigen::Dynamic, 2> uv(ns, 2);
  for (std::size_t j = 0; j < c.point_count; ++j) {
    bool visible = true;
    for (int s = 0; s < ns; ++s) {
      const Eigen::Vector3d p_cam =
          r * Eigen::Vector3d(c.sigma[s].x[j], c.sigma[s].y[j], c.sigma[s].z[j]) +
          t;
      const auto px = project_fisheye(k, p_cam);
      if (!px) {
        visible = false;
        break;
      }
      uv.row(s) = px->transpose();
    }
    if (!visible) {
      if (diag) ++diag->behind_camera;
      continue;
    }

    ProjectedPointGaussian g;
    g.packet = packet_index;
    g.index = static_cast<int>(j);
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int s = 0; s < ns; ++s) mean += c.wm[s] * uv.row(s).transpose();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int s = 0; s < ns; ++s) {
      const Eigen::Vector2d d = uv.row(s).transpose() - mean;
      cov.noalias() += c.wc[s] * (d * d.transpose());
    }
    cov = 0.5 * (cov + cov.transpose()).eval();
    if ((c.wc.array() < 0.0).any()) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
      if (es.eigenvalues().minCoeff() < 0.0) {
        const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
        cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      }
    }
    g.mean_uv = mean;
    g.cov_uv = cov;
    g.mean_xyz = recovered[j].mean;
    g.cov_xyz = recovered[j].cov;
    g.range = (r * recovered[j].mean + t).norm();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ProjectedPointGaussian> project_direct(
    const LidarPacket& pk, int packet_index, const RigidTransform& t_cam_ld,
    const FisheyeIntrinsics& k, ProjectionDiagnostics* diag) {
  const Eigen::Matrix3d r = t_cam_ld.rotation();
  const Eigen::Vector3d t = t_cam_ld.trans();
  std::vector<ProjectedPointGaussian> out;
  out.reserve(pk.points.size());
  for (std::size_t j = 0; j < pk.points.size(); ++j) {
    const Eigen::Vector3d p(pk.points[j].x, pk.points[j].y, pk.points[j].z);
    const Eigen::Vector3d p_cam = r * p + t;
    const auto px = project_fisheye(k, p_cam);
    if (!px) {
      if (diag) ++diag->behind_camera;
      continue;
    }
    ProjectedPointGaussian g;
    g.packet = packet_index;
    g.index = static_cast<int>(j);
    g.mean_uv = *px;
    g.mean_xyz = p;
    g.range = p_cam.norm();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace semfuse
