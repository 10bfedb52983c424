#include "oculo/rotations.hpp"

#include <cmath>

namespace oculo {

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3& m) {
    return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 exp_map(const Vec3& eta) {
    const double angle = eta.norm();
    const Mat3 k = hat(eta);
    if (angle < kSmallAngle) {
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const double s = std::sin(angle) / angle;
    const double c = (1.0 - std::cos(angle)) / (angle * angle);
    return Mat3::Identity() + s * k + c * k * k;
}

double rotation_angle(const Mat3& rotation) {
    const double c = 0.5 * (rotation.trace() - 1.0);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

Vec3 log_map(const Mat3& rotation) {
    const double angle = rotation_angle(rotation);
    if (angle > M_PI - kChartMargin) {
        throw OutOfChartError("log_map: rotation angle too close to pi");
    }
    const Vec3 w = vee(rotation - rotation.transpose());
    if (angle < kSmallAngle) {
        // sin(a)/a ~ 1 - a^2/6; w = 2 sin(a) n
        return 0.5 * w;
    }
    return (angle / (2.0 * std::sin(angle))) * w;
}

bool is_rotation(const Mat3& rotation, double tol) {
    const double det_err = std::abs(rotation.determinant() - 1.0);
    const double ortho_err =
        (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    return det_err <= tol && ortho_err <= tol;
}

Mat3 orthonormalize(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

Vec3 rotvec_of(const Mat3& rotation) {
    const Vec3 eta = log_map(rotation);
    const double angle = eta.norm();
    if (angle < kSmallAngle) {
        return 0.5 * eta;
    }
    return (std::tan(0.5 * angle) / angle) * eta;
}

Mat3 matrix_of(const Vec3& rotvec) {
    const double t = rotvec.norm();  // tan(rho/2)
    if (t < kSmallAngle) {
        return exp_map(2.0 * rotvec);
    }
    const double angle = 2.0 * std::atan(t);
    return exp_map((angle / t) * rotvec);
}

Mat3 rot_x(double angle) { return exp_map(Vec3(angle, 0.0, 0.0)); }
Mat3 rot_y(double angle) { return exp_map(Vec3(0.0, angle, 0.0)); }
Mat3 rot_z(double angle) { return exp_map(Vec3(0.0, 0.0, angle)); }

Mat3 matrix_of(const EulerAngles& angles) {
    return rot_z(angles.yaw) * rot_y(angles.pitch) * rot_x(angles.torsion);
}

EulerAngles euler_of(const Mat3& rotation) {
    // R = Rz(yaw) Ry(pitch) Rx(torsion)
    EulerAngles e;
    e.pitch = std::asin(std::clamp(-rotation(2, 0), -1.0, 1.0));
    e.yaw = std::atan2(rotation(1, 0), rotation(0, 0));
    e.torsion = std::atan2(rotation(2, 1), rotation(2, 2));
    return e;
}

double listing_torsion(double pitch, double yaw) {
    return 2.0 * std::atan(std::tan(0.5 * pitch) * std::tan(0.5 * yaw));
}

std::vector<Vec3> rotate_about_z(const std::vector<Vec3>& rotvecs, double angle) {
    const Mat3 rz = rot_z(angle);
    std::vector<Vec3> out;
    out.reserve(rotvecs.size());
    for (const Vec3& r : rotvecs) {
        out.push_back(rotvec_of(rz * matrix_of(r) * rz.transpose()));
    }
    return out;
}

}  // namespace oculo
