#pragma once

// Command-line pipeline over the file formats: parse, normalize, feas4,
// compile, witness, verify, eval, solve. Every command is a thin adapter
// around one library operation with deterministic byte-for-byte output.
//
// Exit codes: 0 success (including CertifiedTrue and Sat), 1
// CertifiedFalse, 2 Unknown, 3 syntax errors, 4 semantic errors
// (unknown symbols, unsupported fragments, malformed instances, domain
// and exactness failures), 5 file and document errors, 6 internal.

namespace etrnn {

int cli_main(int argc, char** argv);

} // namespace etrnn
