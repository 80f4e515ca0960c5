// Built-in verification suite: eleven end-to-end checks with pinned
// tolerances, from weight identities up to full convergence-table
// reproduction and byte-level determinism. Reachable as `fdk verify`.
#pragma once

#include <ostream>

namespace fdk {

// Runs every criterion, printing one PASS/FAIL line each (plus a summary
// line) to `os`. Returns the number of failed criteria; 0 means accepted.
// Criteria never throw out of this function: an escaping exception is
// reported as that criterion's failure.
int run_acceptance(std::ostream& os);

}  // namespace fdk
