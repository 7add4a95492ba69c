#pragma once

#include "nhim/manifest.hpp"

namespace nhim {

// Exit codes: 0 success, 1 config/input problem, 2 solver failure,
// 3 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitVerify = 3;

int cmd_solve(const RunManifest& manifest);
int cmd_rates(const RunManifest& manifest);
int cmd_verify(const RunManifest& manifest, const std::string& manifold_csv);
int cmd_sweep(const RunManifest& manifest);

}  // namespace nhim
