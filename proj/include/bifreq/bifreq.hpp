#pragma once

#include "bifreq/golden.hpp"
#include "bifreq/frequency.hpp"
#include "bifreq/fsystem.hpp"
#include "bifreq/plugin.hpp"
#include "bifreq/checker.hpp"
#include "bifreq/graph.hpp"
#include "bifreq/allocation.hpp"
#include "bifreq/harness.hpp"
#include "bifreq/io.hpp"
