#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace newsjump {

/// Flat key-value text file with optional `[section]` headers.
///
/// Lines are `key = value`; `#` and `;` start comments. Keys are stored as
/// `section.key` (or just `key` before the first section). Repeated keys are
/// kept in file order.
class KeyValueFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    static KeyValueFile parse(std::string_view text);
    static KeyValueFile load(const std::filesystem::path& path);

    std::optional<std::string> get(std::string_view key) const;
    std::vector<std::string> get_all(std::string_view key) const;
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

std::string trim_copy(std::string_view s);
/// Splits on `sep`, trimming each piece and dropping empty pieces.
std::vector<std::string> split_list(std::string_view s, char sep = ',');

}  // namespace newsjump
