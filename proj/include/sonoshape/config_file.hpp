#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

namespace sonoshape {

/// Line-oriented `key = value` text with `#` comments.
///
/// Keys are tracked as they are consumed so callers can reject leftovers
/// once every schema has had a look.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text);
    static KeyValueFile load(const std::string& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> take(const std::string& key) const;
    std::optional<double> take_double(const std::string& key) const;
    std::optional<long long> take_int(const std::string& key) const;

    /// Throws ValidationError listing every key nobody consumed.
    void reject_unconsumed() const;

    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> consumed_;
};

}  // namespace sonoshape
