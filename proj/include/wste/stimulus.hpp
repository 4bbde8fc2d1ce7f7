// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string_view>
#include <vector>

#include "wste/ir.hpp"
#include "wste/oracle.hpp"

namespace wste {

/// One frame per non-empty line of `name=value` pairs. A value is decimal,
/// 0x hex, 0b binary (digits may be X) or a lone X. Every input must be
/// assigned in every frame; `//` and `#` start comments.
std::vector<std::map<unsigned, XValue>> parse_stimulus(std::string_view text, const Module& m);

}  // namespace wste
