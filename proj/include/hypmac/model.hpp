#pragma once

#include <optional>
#include <string_view>

namespace hypmac {

enum class Model { AC, MAC, HypAC, HypMAC, ChN3 };

inline bool is_hyperbolic(Model m) { return m == Model::HypAC || m == Model::HypMAC; }
inline bool is_mass_conserving(Model m) { return m == Model::MAC || m == Model::HypMAC; }

/// Config spelling: ac, mac, hyp-ac, hyp-mac, ch-n3.
std::string_view to_string(Model m);
std::optional<Model> parse_model(std::string_view name);

}  // namespace hypmac
