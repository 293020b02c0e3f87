#pragma once

#include "minsess/semantics.hpp"

#include <string>
#include <vector>

namespace minsess::detail {

struct KeyedStep {
    Label label;
    ProcRef target;
    std::string key; // canonical key of the target
};

// Steps of `p` (already desugared), deduplicated by label and target key.
// Visible actions are included only when `visible` is set.
std::vector<KeyedStep> keyed_steps(const ProcRef& p, const InputCandidates& inputs, bool visible);

std::string label_key(const Label& l);

} // namespace minsess::detail
