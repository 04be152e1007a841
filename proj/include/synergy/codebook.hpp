// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synergy {

// The closed CPS code set, ordered by interaction level.
enum class Code : std::uint8_t { I, O1, O2, W1, W2, W3, S1, S2, S3, C1 };

enum class Level : std::uint8_t { Irrelevant, Operation, Wayfinding, SenseMaking, Creation };

// The four task subsystems the synergy model operates on.
enum class Subsystem : std::uint8_t { O, W, S, C };

inline constexpr std::size_t kCodeCount = 10;
inline constexpr std::size_t kTaskCodeCount = 9;
inline constexpr std::size_t kSubsystemCount = 4;

inline constexpr std::array<Code, kCodeCount> kAllCodes{
    Code::I, Code::O1, Code::O2, Code::W1, Code::W2, Code::W3, Code::S1, Code::S2, Code::S3, Code::C1};

// Task-relevant codes (everything except I); this is the column order of a metric panel.
inline constexpr std::array<Code, kTaskCodeCount> kTaskCodes{
    Code::O1, Code::O2, Code::W1, Code::W2, Code::W3, Code::S1, Code::S2, Code::S3, Code::C1};

inline constexpr std::array<Subsystem, kSubsystemCount> kSubsystems{
    Subsystem::O, Subsystem::W, Subsystem::S, Subsystem::C};

std::string_view to_string(Code code);
std::string_view to_string(Level level);
std::string_view to_string(Subsystem subsystem);

std::optional<Code> code_from_string(std::string_view token);
// Throws UnknownCode.
Code parse_code_token(std::string_view token);
std::optional<Level> level_from_string(std::string_view token);

Level level_of(Code code);
bool is_task_code(Code code);
// Column index of a task code in kTaskCodes; I has no column.
std::optional<std::size_t> task_index(Code code);
// Only defined for task codes.
Subsystem subsystem_of(Code code);
// Task codes belonging to a subsystem, in kTaskCodes order.
std::vector<Code> codes_of(Subsystem subsystem);

// "Operational Interaction (O)" and friends.
std::string_view level_display_name(Level level);

struct CodebookEntry {
    Code code;
    std::string behavior_name;
    std::string description;
    std::string example;

    Level level() const { return level_of(code); }
    bool operator==(const CodebookEntry&) const = default;
};

/// The coding scheme: one entry per code, in kAllCodes order.
class Codebook {
public:
    /// English coding scheme shipped with the library.
    static Codebook builtin();

    /// Reads the override format: header `code,level,behavior_name,description,example`,
    /// exactly one row per code. Throws MalformedRow / UnknownCode.
    static Codebook read_csv(std::istream& in);
    static Codebook load(const std::filesystem::path& path);

    void write_csv(std::ostream& out) const;

    const std::vector<CodebookEntry>& entries() const noexcept { return entries_; }
    const CodebookEntry& entry(Code code) const;

    bool operator==(const Codebook&) const = default;

private:
    explicit Codebook(std::vector<CodebookEntry> entries);

    std::vector<CodebookEntry> entries_;
};

} // namespace synergy
