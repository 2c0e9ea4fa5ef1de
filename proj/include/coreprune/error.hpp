#ifndef COREPRUNE_ERROR_HPP
#define COREPRUNE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace coreprune {

// Coarse classification used by the CLI to pick an exit status.
enum class error_category { usage, data, numeric };

class error : public std::runtime_error {
public:
    error(error_category cat, const std::string& kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), category_(cat), message_(message) {}

    error_category category() const noexcept { return category_; }
    /// The message without the "kind: " prefix.
    const std::string& message() const noexcept { return message_; }

private:
    error_category category_;
    std::string message_;
};

#define COREPRUNE_DEFINE_ERROR(name, cat)                                   \
    class name : public error {                                             \
    public:                                                                 \
        explicit name(const std::string& what)                              \
            : error(error_category::cat, #name, what) {}                        \
    };

COREPRUNE_DEFINE_ERROR(invalid_parameter, usage)
COREPRUNE_DEFINE_ERROR(dimension_mismatch, usage)
COREPRUNE_DEFINE_ERROR(not_prunable, usage)
COREPRUNE_DEFINE_ERROR(empty_dataset, data)
COREPRUNE_DEFINE_ERROR(malformed_model, data)
COREPRUNE_DEFINE_ERROR(malformed_idx, data)
COREPRUNE_DEFINE_ERROR(all_zero_sensitivity, numeric)
COREPRUNE_DEFINE_ERROR(non_finite_loss, numeric)
COREPRUNE_DEFINE_ERROR(degenerate_instance, numeric)

#undef COREPRUNE_DEFINE_ERROR

}  // namespace coreprune

#endif  // COREPRUNE_ERROR_HPP
