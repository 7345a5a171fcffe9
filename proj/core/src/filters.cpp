#include "filters.hpp"

#include <algorithm>
#include <cmath>

namespace scp::detail {

double Plane::clamped(int y, int x) const {
    y = std::clamp(y, 0, height - 1);
    x = std::clamp(x, 0, width - 1);
    return (*this)(y, x);
}

int gaussian_radius(double sigma) {
    return sigma > 0.0 ? static_cast<int>(std::ceil(3.0 * sigma)) : 0;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int r = gaussian_radius(sigma);
    if (r == 0) return {1.0};
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    return k;
}

Plane gaussian_blur(const Plane& src, double sigma) {
    const std::vector<double> k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    if (r == 0) return src;
    Plane tmp(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * src.clamped(y, x + i);
            tmp(y, x) = acc;
        }
    }
    Plane out(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.clamped(y + i, x);
            out(y, x) = acc;
        }
    }
    return out;
}

Plane diff_x(const Plane& src) {
    Plane out(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            out(y, x) = 0.5 * (src.clamped(y, x + 1) - src.clamped(y, x - 1));
        }
    }
    return out;
}

Plane diff_y(const Plane& src) {
    Plane out(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            out(y, x) = 0.5 * (src.clamped(y + 1, x) - src.clamped(y - 1, x));
        }
    }
    return out;
}

}  // namespace scp::detail
