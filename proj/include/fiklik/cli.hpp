#ifndef FIKLIK_CLI_HPP
#define FIKLIK_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace fiklik {

// Exit codes: 0 success (including non-theorem verdicts), 1 no countermodel
// up to the bound, 2 formula syntax error, 3 model/certificate file error,
// 4 internal assertion, fuel exhaustion or failed verification.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fiklik

#endif
