// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace nsbesov {

// Every failure carries a stable reason code; the CLI maps it to an exit status
// and a one-line diagnostic.
enum class Reason {
  invalid_argument,
  grid_mismatch,
  symmetry_violation,
  band_too_narrow,
  ledger_violation,
  gate_refused,
  divergence,
  cfl_violation,
  energy_slack,
  io,
};

const char* reason_name(Reason r) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

[[noreturn]] inline void fail(Reason r, const std::string& what) { throw Error(r, what); }

inline void require(bool ok, Reason r, const std::string& what) {
  if (!ok) fail(r, what);
}

// Non-fatal diagnostics (nonzero mean under projection, truncated tails).
// The default sink writes to stderr; tests and the CLI may replace it.
using LintSink = std::function<void(const std::string&)>;
void set_lint_sink(LintSink sink);
void lint(const std::string& message);

}  // namespace nsbesov
