#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace membrane::cli {

// Runs the command line `args` (args[0] is the program name). Returns the
// process exit status: 0 on success, 1 on a module failure, 2 on a usage
// error. Error objects are written to `err` as JSON.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Worker count for batch runs: MEMBRANE_SPECTRA_THREADS when set to a
// positive integer, otherwise the hardware concurrency.
unsigned thread_limit();

}  // namespace membrane::cli
