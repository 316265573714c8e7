#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "bonemap4d/errors.hpp"
#include "bonemap4d/math.hpp"

namespace bm4d {

/// Sinusoidal encoding hyperparameters: per-scalar width (even) and the
/// transformer frequency base.
struct EmbeddingConfig {
    int dim = 64;
    double max_period = 10000.0;

    void validate() const {
        if (dim <= 0 || dim % 2 != 0) throw ConfigError("embedding dim must be even and positive");
        if (!(max_period > 0.0)) throw ConfigError("max_period must be positive");
    }
};

/// Standard transformer schedule:
///   out[2k]   = sin(x / max_period^(2k/dim))
///   out[2k+1] = cos(x / max_period^(2k/dim))
inline std::vector<double> sinusoidal(double x, const EmbeddingConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(x)) throw ValueError("sinusoidal input must be finite");
    std::vector<double> out(cfg.dim);
    for (int k = 0; k < cfg.dim / 2; ++k) {
        const double freq = std::pow(cfg.max_period, -2.0 * k / cfg.dim);
        out[2 * k] = std::sin(x * freq);
        out[2 * k + 1] = std::cos(x * freq);
    }
    return out;
}

/// Camera pose embedding: one sinusoidal block per rotation-matrix entry
/// (row-major), concatenated to 9*dim values.
struct CameraEmbedding {
    std::vector<double> values;
};

inline CameraEmbedding embed_camera(const Mat3& relative_rotation, const EmbeddingConfig& cfg) {
    cfg.validate();
    if (orthonormality_error(relative_rotation) >= 1e-6 ||
        std::abs(relative_rotation.determinant() - 1.0) >= 1e-6)
        throw DegenerateInput("embed_camera requires an orthonormal rotation");
    CameraEmbedding emb;
    emb.values.reserve(static_cast<std::size_t>(9) * cfg.dim);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const auto block = sinusoidal(relative_rotation(r, c), cfg);
            emb.values.insert(emb.values.end(), block.begin(), block.end());
        }
    }
    return emb;
}

inline std::vector<double> embed_frame_index(int t, const EmbeddingConfig& cfg) {
    if (t < 0) throw ValueError("frame index must be non-negative");
    return sinusoidal(static_cast<double>(t), cfg);
}

/// Seam for the network-side linear map over the concatenated camera
/// embedding; the default is a pass-through.
using EmbeddingTransform = std::function<std::vector<double>(const std::vector<double>&)>;

inline EmbeddingTransform identity_embedding_transform() {
    return [](const std::vector<double>& v) { return v; };
}

}  // namespace bm4d
