#pragma once

#include <collatz/core.hpp>
#include <collatz/enumeration.hpp>
#include <collatz/errors.hpp>
#include <collatz/io.hpp>
#include <collatz/limits.hpp>
#include <collatz/parallel.hpp>
#include <collatz/stopping.hpp>
#include <collatz/subseq.hpp>
