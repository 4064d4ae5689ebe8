// Copyright 2026 The wafersim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cli.hpp - the wafersim command line.
//
//   wafersim validate --config C [--network F] [--stimulus F]
//   wafersim simulate --config C --network F [--stimulus F] --steps N --seed S
//                     [--trace F] [--report F] [--workers K] [--debug]
//                     [--steps-log F] [--packet-trace F] [--utilization U]
//   wafersim map      --config C (--network F | --connectome F [--synthesize])
//                     --out F [--network-out F] [--fidelity F] [--seed S]
//                     [--utilization U] [--keep-diagonal]
//   wafersim plan     --netlist F --geometry F [--algorithm hungarian|greedy]
//                     --out F [--feedback F]
//   wafersim report   --trace F [--report F] [--config C] [--out F]
//
// `--config default` selects the built-in wafer. Relative output paths are
// resolved against $WAFERSIM_OUT_DIR when it is set. Every written output
// gets a <output>.manifest.json next to the first output file.
//
// Exit codes: 0 ok, 2 usage, 3 parse/validation/degenerate input,
// 4 infeasible, 5 protocol/encoding (simulator fault), 1 anything else.
#ifndef WAFERSIM_CLI_HPP_
#define WAFERSIM_CLI_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "wafersim/error.hpp"

namespace wafersim
{

inline constexpr const char *tool_version = "1.0.0";

int exit_code_for(ErrorCategory category) noexcept;

// Lower-case hex SHA-256.
std::string sha256_hex(const std::string &bytes);

struct ManifestInput
{
    std::string role;
    std::filesystem::path path;
    std::string sha256;
};

struct RunManifest
{
    std::string subcommand;
    std::vector<ManifestInput> inputs;
    // Digest over every input's bytes, in order.
    std::string input_hash;
    std::uint64_t seed{0};
    std::string version{tool_version};
    std::string timestamp;
    std::vector<std::filesystem::path> outputs;
};

std::string format_manifest(const RunManifest &manifest);

// args excludes the program name.
int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace wafersim

#endif
