/*!
 * Copyright (c) 2026 by Contributors
 * \file tokengate/formats.hpp
 * \brief Asserted string formats, shared by the validator and the compiler.
 */
#ifndef TOKENGATE_FORMATS_HPP_
#define TOKENGATE_FORMATS_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tokengate/regex.hpp"

namespace tokengate {

// The asserted format set: date-time, date, time, email, uri, uuid, ipv4,
// ipv6. Every other `format` value is an annotation and is ignored.
const std::vector<std::string>& asserted_formats();

bool format_is_asserted(std::string_view name);

// Anchored machine for an asserted format; nullptr for annotation formats.
std::shared_ptr<const ByteNfa> format_nfa(std::string_view name);

// Full-match check against the format machine (true for annotation formats).
bool format_check(std::string_view name, std::string_view value);

}  // namespace tokengate

#endif  // TOKENGATE_FORMATS_HPP_
