#include "travmap/fusion.hpp"

#include <cmath>

namespace travmap::fusion {

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw InputError("CameraIntrinsics: focal length <= 0");
    if (width <= 0 || height <= 0) throw InputError("CameraIntrinsics: non-positive image size");
    if (!(cx >= 0.0) || cx >= width || !(cy >= 0.0) || cy >= height)
        throw InputError("CameraIntrinsics: principal point outside image");
    for (double d : distortion)
        if (!std::isfinite(d)) throw InputError("CameraIntrinsics: non-finite distortion");
    if (distortion.size() > 5) throw InputError("CameraIntrinsics: expected at most 5 coefficients");
}

void RigidTransform::validate() const {
    const Eigen::Matrix3d residual = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    if (residual.cwiseAbs().maxCoeff() > 1e-9)
        throw InputError("RigidTransform: rotation not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-9)
        throw InputError("RigidTransform: rotation determinant != +1");
    if (!translation.allFinite()) throw InputError("RigidTransform: non-finite translation");
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
}

void LidarPoint::validate() const {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw InputError("LidarPoint: non-finite coordinate");
}

std::optional<PixelCoord> project_point(const CameraIntrinsics& intr, const RigidTransform& extr,
                                        const LidarPoint& p, double near_plane) {
    const Eigen::Vector3d cam = extr.apply(Eigen::Vector3d(p.x, p.y, p.z));
    if (cam.z() <= near_plane) return std::nullopt;

    double xn = cam.x() / cam.z();
    double yn = cam.y() / cam.z();

    if (!intr.distortion.empty()) {
        double k1 = 0, k2 = 0, p1 = 0, p2 = 0, k3 = 0;
        const auto& d = intr.distortion;
        if (d.size() > 0) k1 = d[0];
        if (d.size() > 1) k2 = d[1];
        if (d.size() > 2) p1 = d[2];
        if (d.size() > 3) p2 = d[3];
        if (d.size() > 4) k3 = d[4];
        const double r2 = xn * xn + yn * yn;
        const double radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3));
        const double xd = xn * radial + 2.0 * p1 * xn * yn + p2 * (r2 + 2.0 * xn * xn);
        const double yd = yn * radial + p1 * (r2 + 2.0 * yn * yn) + 2.0 * p2 * xn * yn;
        xn = xd;
        yn = yd;
    }

    const double u = intr.fx * xn + intr.cx;
    const double v = intr.fy * yn + intr.cy;

    // The sampled pixel is the nearest one; it must exist.
    const long px = std::lround(u), py = std::lround(v);
    if (px < 0 || px >= intr.width || py < 0 || py >= intr.height) return std::nullopt;
    return PixelCoord{u, v};
}

std::vector<AugmentedPoint> augment_cloud(const std::vector<LidarPoint>& cloud,
                                          const spectral::SpectralCube& cube,
                                          const CameraIntrinsics& intr,
                                          const RigidTransform& extr) {
    intr.validate();
    extr.validate();
    cube.validate();
    if (cube.width != intr.width || cube.height != intr.height)
        throw InputError("augment_cloud: cube dimensions do not match camera image size");

    std::vector<AugmentedPoint> out;
    out.reserve(cloud.size());
    for (const LidarPoint& p : cloud) {
        p.validate();
        AugmentedPoint ap;
        ap.position = Eigen::Vector3d(p.x, p.y, p.z);
        ap.frame = Frame::Sensor;
        if (auto px = project_point(intr, extr, p)) {
            const int ix = static_cast<int>(std::lround(px->u));
            const int iy = static_cast<int>(std::lround(px->v));
            ap.reflectance = cube.spectrum_at(ix, iy);
        }
        out.push_back(std::move(ap));
    }
    return out;
}

}  // namespace travmap::fusion
