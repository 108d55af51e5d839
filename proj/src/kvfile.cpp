#include "newsjump/kvfile.hpp"

#include "newsjump/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace newsjump {

std::string trim_copy(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(sep, start);
        if (end == std::string_view::npos) end = s.size();
        auto piece = trim_copy(s.substr(start, end - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        start = end + 1;
    }
    return out;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
    KeyValueFile file;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        auto hash = raw.find_first_of("#;");
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto line = trim_copy(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            section = trim_copy(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        auto key = trim_copy(std::string_view(line).substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        file.entries_.push_back({std::move(key), trim_copy(std::string_view(line).substr(eq + 1)), line_no});
    }
    return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
    std::optional<std::string> found;
    for (const auto& e : entries_)
        if (e.key == key) found = e.value;
    return found;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
        if (e.key == key) out.push_back(e.value);
    return out;
}

}  // namespace newsjump
