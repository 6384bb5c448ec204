#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hornlab/catalog.hpp"
#include "hornlab/fatou.hpp"

namespace hornlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verification or domain failure, I/O failure
inline constexpr int kExitUsage = 2;    // unknown id, malformed JSON, bad arguments

// Thrown for problems with the request itself; maps to kExitUsage.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Everything a subcommand depends on. Threads and the output directory are
// deliberately not part of the canonical form: they must not change results.
struct RunDescriptor {
  std::string command;
  json map;                 // null, {"ref": id} or an inline map spec
  std::string pair;         // pair id, empty when unused
  json config = json::object();  // FatouConfig overrides
  json params = json::object();  // subcommand parameters, defaults filled in
  std::string out_dir;           // empty: report on stdout only
  int threads = 0;

  static RunDescriptor from_json(const json& doc);
  // Fills parameter defaults for the command; throws UsageError on unknown
  // commands or parameters.
  void complete();
  json canonical() const;
  std::string hash() const;
};

const std::vector<std::string>& command_names();

struct RunResult {
  int exit_code = kExitOk;
  json report;
  std::vector<std::string> written;
};

RunResult execute(const RunDescriptor& descriptor, const Catalog& catalog);

// Full command-line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hornlab
