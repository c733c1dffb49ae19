// Invariant self-test battery: runs every module's internal identities at a
// moderate grid size and prints one line per check. Returns the number of
// failures (skips do not count).

#pragma once

#include <iosfwd>

namespace discflow {

struct SelfTestSummary {
    int passed = 0;
    int failed = 0;
    int skipped = 0;
};

SelfTestSummary selftest(std::ostream& os, int nr = 256, int modes = 256);

}  // namespace discflow
