#pragma once

#include <doctest.h>

// Purely relative comparison; doctest's default scale of 1 would make tiny SI values pass trivially.
inline doctest::Approx approx(double value) { return doctest::Approx(value).scale(0.0); }
