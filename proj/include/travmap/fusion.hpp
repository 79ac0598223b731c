#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "travmap/spectral.hpp"

namespace travmap::fusion {

// Camera-frame points closer than this are rejected before the perspective
// division.
inline constexpr double kDefaultNearPlaneM = 0.05;

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
    // Brown-Conrady coefficients k1, k2, p1, p2, k3; shorter lists are
    // zero-padded, empty means ideal pinhole.
    std::vector<double> distortion;

    void validate() const;  // InputError: fx/fy <= 0, principal point outside image
};

struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    void validate() const;  // InputError: not orthonormal or det != +1 within 1e-9
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
    RigidTransform inverse() const;
};

struct LidarPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::optional<double> intensity;

    void validate() const;  // InputError: non-finite coordinate
};

struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

enum class Frame { Sensor, World };

struct AugmentedPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Frame frame = Frame::Sensor;
    std::optional<spectral::ReflectanceSpectrum> reflectance;
    std::optional<double> plants_probability;  // absent whenever reflectance is
    std::optional<double> mass_density;        // kg/m^2, >= 0 when present
};

// Camera-frame projection of a sensor-frame point: rotate/translate into the
// camera, reject depth <= near_plane, distort normalized coordinates, apply
// focal lengths. Empty result = outside the frustum (behind the camera or
// off the image); the nearest integer pixel must lie inside the image.
std::optional<PixelCoord> project_point(const CameraIntrinsics& intr, const RigidTransform& extr,
                                        const LidarPoint& p,
                                        double near_plane = kDefaultNearPlaneM);

// One AugmentedPoint per input point, in input order. Points projecting into
// the cube carry the nearest pixel's spectrum; the rest carry no reflectance.
// InputError when cube dimensions differ from the intrinsics image size.
std::vector<AugmentedPoint> augment_cloud(const std::vector<LidarPoint>& cloud,
                                          const spectral::SpectralCube& cube,
                                          const CameraIntrinsics& intr,
                                          const RigidTransform& extr);

}  // namespace travmap::fusion
