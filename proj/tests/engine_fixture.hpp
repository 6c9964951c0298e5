#ifndef MATEBENCH_TESTS_ENGINE_FIXTURE_HPP
#define MATEBENCH_TESTS_ENGINE_FIXTURE_HPP

// Shared engine lookup for tests: MATEBENCH_ENGINE env var, a stockfish on
// PATH, or the node build bundled under third_party/ by fetch-engine.sh.

#include <cstdlib>
#include <string>

namespace matebench::tests {

inline std::string engine_command() {
    if (const char* env = std::getenv("MATEBENCH_ENGINE"); env && *env) return env;
    if (std::system("command -v stockfish >/dev/null 2>&1") == 0) return "stockfish";
    return std::string("node ") + MATEBENCH_SOURCE_DIR +
           "/third_party/node_modules/stockfish/bin/stockfish-18-lite-single.js";
}

}  // namespace matebench::tests

#endif  // MATEBENCH_TESTS_ENGINE_FIXTURE_HPP
