#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sensapi {

// Malformed input text: broken JSON, wrong schema_version, missing or
// unknown fields. Carries the byte offset when the underlying parser
// reports one.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg, std::size_t byte_offset = 0)
        : std::runtime_error(msg), byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Structurally well-formed input that violates a documented invariant
// (duplicate ids, unknown subcategory, caller owner not in `types`, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sensapi
