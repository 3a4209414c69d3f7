#ifndef EVIDENCER_TOOLS_CLI_H_
#define EVIDENCER_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace evidencer::cli {

// Exit statuses.
enum Status : int {
  kOk = 0,
  kUsage = 2,
  kConfigError = 3,
  kIoError = 4,
  kParseError = 5,
  kInvalidInput = 6,
  kIndexFormat = 7,
  kScorerError = 8,
  kInternal = 70,
};

// Runs the command line; args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace evidencer::cli

#endif  // EVIDENCER_TOOLS_CLI_H_
