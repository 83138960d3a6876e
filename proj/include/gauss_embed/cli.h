#ifndef GAUSS_EMBED_CLI_H_
#define GAUSS_EMBED_CLI_H_

#include <iosfwd>

namespace gauss_embed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `gauss-embed` tool. Subcommands: build-vocab, train,
// train-ei, eval-sim, eval-entail, nearest, viz, export.
// Returns 0 on success, 1 on usage/configuration errors, 2 on data errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_CLI_H_
