// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

namespace lqomor {

/// Compiles a scalar input expression in the variable t, e.g.
/// "100*sin(2*t)" or "exp(sin(2*t))". Supported: numbers, t, + - * / ^,
/// parentheses, and sin, cos, tan, exp, sqrt, abs, tanh.
/// Throws std::invalid_argument on malformed input.
std::function<double(double)> parse_input_expression(const std::string& text);

}  // namespace lqomor
