#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace oculo {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Thrown when a rotation is outside the chart of the log/rotvec maps
/// (rotation angle too close to pi).
class OutOfChartError : public std::domain_error {
public:
    explicit OutOfChartError(const std::string& what) : std::domain_error(what) {}
};

/// Head-fixed x/y/z Euler angles: torsion about x, pitch about y, yaw about z.
struct EulerAngles {
    double torsion = 0.0;  // psi, rad
    double pitch = 0.0;    // phi, rad
    double yaw = 0.0;      // theta, rad
};

// Angle below which exp/log switch to their series expansions.
inline constexpr double kSmallAngle = 1e-7;
// Margin kept from the pi boundary of the log chart.
inline constexpr double kChartMargin = 1e-6;

/// Skew-symmetric (cross-product) matrix of v: hat(v) * w == v x w.
Mat3 hat(const Vec3& v);

/// Inverse of hat for a skew-symmetric matrix.
Vec3 vee(const Mat3& m);

/// SO(3) exponential: rotation by |eta| about eta/|eta| (Rodrigues form,
/// second-order series below kSmallAngle).
Mat3 exp_map(const Vec3& eta);

/// SO(3) logarithm. Requires rotation angle < pi - kChartMargin.
Vec3 log_map(const Mat3& rotation);

/// Rotation angle of R in [0, pi].
double rotation_angle(const Mat3& rotation);

/// True if R is orthonormal with determinant one, within tol.
bool is_rotation(const Mat3& rotation, double tol = 1e-9);

/// Nearest rotation matrix (polar projection via SVD).
Mat3 orthonormalize(const Mat3& m);

/// Euler-Rodrigues rotation vector r = tan(rho/2) * axis, in rad/2 units.
Vec3 rotvec_of(const Mat3& rotation);

/// Rotation matrix of an Euler-Rodrigues rotation vector.
Mat3 matrix_of(const Vec3& rotvec);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Composition of head-fixed rotations about x, y, z: R = Rz(yaw) Ry(pitch) Rx(torsion).
Mat3 matrix_of(const EulerAngles& angles);

EulerAngles euler_of(const Mat3& rotation);

/// Listing's law torsion for a given pitch/yaw: psi = 2 atan(tan(phi/2) tan(theta/2)).
double listing_torsion(double pitch, double yaw);

/// Express each rotation in a frame rotated by `angle` about z:
/// r' = rotvec of Rz(angle) R(r) Rz(angle)^T. For rotation vectors this
/// conjugation equals rotating the components by Rz(angle).
std::vector<Vec3> rotate_about_z(const std::vector<Vec3>& rotvecs, double angle);

}  // namespace oculo
