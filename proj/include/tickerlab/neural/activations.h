#pragma once

#include <cmath>

namespace tickerlab::nn {

// Logistic function, evaluated on the side that cannot overflow exp().
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace tickerlab::nn
