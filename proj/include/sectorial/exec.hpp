// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace sectorial {

// Selects the kernel variant. Serial is the reference implementation the
// parallel kernels are tested against; both produce results in the same
// deterministic order.
enum class Exec { Serial, Parallel };

int max_threads();

}  // namespace sectorial
