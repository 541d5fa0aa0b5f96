// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace xlt {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

inline bool is_ascii(char32_t cp) { return cp < 0x80; }

}  // namespace xlt
