#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ctxgram {

/// Command-line front end. `args` excludes the program name. Returns 0 on
/// success/accept/PASS, 1 on reject/FAIL, 2 on usage, parse or budget errors
/// (with a message on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctxgram
