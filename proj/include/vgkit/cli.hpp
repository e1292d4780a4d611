#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace vgkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;  // bad arguments, config or mismatched inputs
inline constexpr int kExitRuntime = 2;     // I/O failure, malformed files, non-finite loss

// File names inside a dataset directory written by `generate`.
inline constexpr const char* kTrainFile = "train.jsonl";
inline constexpr const char* kValFile = "val.jsonl";
inline constexpr const char* kTestFile = "test.jsonl";
inline constexpr const char* kVocabFile = "vocab.txt";
inline constexpr const char* kConfigFile = "config.cfg";

// Runs one `vgkit` command. `args` excludes the program name. Never throws;
// errors are written to `err` and mapped to the exit codes above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vgkit
