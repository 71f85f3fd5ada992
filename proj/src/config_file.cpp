#include "sonoshape/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text) {
    KeyValueFile file;
    file.text_ = text;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ValidationError("config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!file.entries_.emplace(key, value).second) {
            throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return file;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::optional<std::string> KeyValueFile::take(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second;
}

std::optional<double> KeyValueFile::take_double(const std::string& key) const {
    const auto raw = take(key);
    if (!raw) return std::nullopt;
    double value = 0.0;
    const auto* end = raw->data() + raw->size();
    const auto [ptr, ec] = std::from_chars(raw->data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError("config key '" + key + "': not a number: '" + *raw + "'");
    }
    return value;
}

std::optional<long long> KeyValueFile::take_int(const std::string& key) const {
    const auto raw = take(key);
    if (!raw) return std::nullopt;
    long long value = 0;
    const auto* end = raw->data() + raw->size();
    const auto [ptr, ec] = std::from_chars(raw->data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError("config key '" + key + "': not an integer: '" + *raw + "'");
    }
    return value;
}

void KeyValueFile::reject_unconsumed() const {
    std::string unknown;
    for (const auto& [key, value] : entries_) {
        if (consumed_.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw ValidationError("unknown config keys: " + unknown);
}

}  // namespace sonoshape
