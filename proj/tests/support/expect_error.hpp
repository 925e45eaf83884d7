#pragma once

#include "hmcert/error.hpp"

// Evaluates `expr` and reports the ErrorCode it threw, if any.
#define HMCERT_THROWN_CODE(expr)                         \
  ([&]() -> std::optional<hmcert::ErrorCode> {           \
    try {                                                \
      (void)(expr);                                      \
    } catch (const hmcert::Error& e) {                   \
      return e.code();                                   \
    }                                                    \
    return std::nullopt;                                 \
  }())
