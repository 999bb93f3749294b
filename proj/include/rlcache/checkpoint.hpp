#pragma once

#include <string>

#include "rlcache/mlp.hpp"

namespace rlcache {

// JSON checkpoint: {"format", "version", "layers": [{"rows", "cols", "data"}]}
// with column-major data. Doubles are written with round-trip precision, so
// save followed by load reproduces every parameter bit for bit.
std::string checkpoint_to_json(const Mlp<double>& net);

// The network must already have the checkpoint's architecture; every layer
// shape is checked. Throws std::invalid_argument on any mismatch.
void checkpoint_from_json(Mlp<double>& net, const std::string& text);

void save_checkpoint(const Mlp<double>& net, const std::string& path);
void load_checkpoint(Mlp<double>& net, const std::string& path);

}  // namespace rlcache
