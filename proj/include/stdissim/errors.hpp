#pragma once

#include <stdexcept>
#include <string>

namespace stdissim {

// Precondition violations on caller-supplied data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidFilter : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class InvalidConfig : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class InvalidGate : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Grid too small to produce any coarse-grained term beyond the first step.
class DegenerateGrid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorruptedState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ToolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace stdissim
