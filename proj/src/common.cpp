// SPDX-License-Identifier: Apache-2.0
#include "csrec/common.hpp"

#include <cstdio>

namespace csrec {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

}  // namespace csrec
