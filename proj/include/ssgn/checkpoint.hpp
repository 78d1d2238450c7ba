#pragma once

#include <optional>
#include <string>

#include "ssgn/adam.hpp"
#include "ssgn/model.hpp"

namespace ssgn {

struct Checkpoint {
    SsgnModel<float> model;
    std::optional<AdamState<float>> adam;
};

// SSGN checkpoint format (little-endian): magic "SSGN", version byte 1,
// arch block (K, L, c_scale as u32), then each parameter tensor in the
// canonical visit order as 4 u32 dims plus a float32 payload (biases as
// (out,1,1,1)). A trailing flag byte gates an optional Adam block: step
// count u64, then the m and v tensors in the same order.
void save_model(const SsgnModel<float>& model, const std::string& path,
                const AdamState<float>* adam = nullptr);

Checkpoint load_model(const std::string& path);

} // namespace ssgn
