/*
 * Copyright 2026 The nemsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace nemsim::mem {

enum class Branch { Logarithmic, Shallow };

/// Minimum bank shares guaranteed to each branch of the L1 interconnect.
struct ArbiterConfig {
  double min_share_shallow = 0.75;
  double min_share_log = 0.25;
  Branch priority = Branch::Shallow;  // wins when neither branch is owed a grant

  /// Throws InvalidConfig if a share is negative or the shares sum above 1.
  void validate() const;
  bool operator==(const ArbiterConfig&) const = default;
};

struct StridedDim {
  std::uint32_t count = 1;
  std::int64_t stride = 0;  // bytes
};

/// A 3-D strided stream of 32-bit word accesses, innermost dimension first.
struct AccessTrace {
  int stream_id = 0;
  Branch branch = Branch::Logarithmic;
  std::uint64_t start_address = 0;
  std::uint64_t length = 0;  // bytes, must equal 4 * count0 * count1 * count2
  std::array<StridedDim, 3> pattern{};
  std::uint64_t issue_cycle = 0;

  /// Serialized word addresses; throws InvalidConfig on a length mismatch or overlapping words.
  std::vector<std::uint64_t> word_addresses() const;
};

struct StreamStats {
  int stream_id = 0;
  std::uint64_t served_words = 0;
  std::uint64_t stall_cycles = 0;  // cycles with at least one pending word left ungranted
  std::uint64_t max_wait = 0;      // longest request-to-grant delay of one word
  std::uint64_t finish_cycle = 0;  // cycle after the last grant
  std::uint32_t max_words_per_cycle = 0;
  bool finished = false;
};

/// Cycles in which both branches requested one bank, and who won them.
struct BankContention {
  std::uint64_t cycles = 0;
  std::array<std::uint64_t, 2> grants{0, 0};  // logarithmic, shallow
};

struct ContentionResult {
  std::vector<StreamStats> streams;
  std::vector<BankContention> banks;
  std::uint64_t cycles = 0;
  /// Per cycle, grants to each branch (only filled when recording is enabled).
  std::vector<std::array<std::uint16_t, 2>> grants_per_cycle;
};

/// Cycle-stepped arbitration of word requests onto interleaved banks.
///
/// Logarithmic masters keep one word outstanding. Shallow masters issue a window of up to
/// `shallow_window_words` contiguous words on distinct banks and move on once all are granted.
/// Each bank grants one word per cycle. Inside a branch masters rotate round-robin per bank;
/// between branches a deficit counter per bank enforces the configured shares.
class TcdmSimulator {
 public:
  TcdmSimulator(const ArbiterConfig& cfg, int banks = 16, int shallow_window_words = 9);

  /// Adds a master; returns its index.
  int add_master(int stream_id, Branch branch, std::vector<std::uint64_t> word_addresses, std::uint64_t issue_cycle = 0);

  void record_grants(bool on) { record_ = on; }

  /// Runs until every master is done or `horizon` cycles have elapsed.
  ContentionResult run(std::uint64_t horizon);

 private:
  struct Master {
    int stream_id;
    Branch branch;
    std::vector<std::uint64_t> words;
    std::uint64_t issue_cycle;
    std::size_t next = 0;                  // first word not yet in a window
    std::vector<std::size_t> window;       // word indices outstanding
    std::vector<std::uint64_t> since;      // cycle each outstanding word was requested
    std::vector<bool> granted;
  };

  void open_window(Master& m, std::uint64_t cycle) const;

  ArbiterConfig cfg_;
  int banks_;
  int window_words_;
  bool record_ = false;
  std::vector<Master> masters_;
};

ContentionResult tcdm_contention(std::span<const AccessTrace> traces, const ArbiterConfig& cfg, std::uint64_t horizon,
                                 int banks = 16);

inline int bank_of(std::uint64_t address, int banks) { return static_cast<int>((address / 4) % static_cast<std::uint64_t>(banks)); }

}  // namespace nemsim::mem
