#pragma once

// Core library: everything except the command-line front end.

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/count_trie.hpp"
#include "smc/error.hpp"
#include "smc/estimation.hpp"
#include "smc/format.hpp"
#include "smc/incidence.hpp"
#include "smc/oracle.hpp"
#include "smc/report.hpp"
#include "smc/resampling.hpp"
#include "smc/rng.hpp"
#include "smc/simulation.hpp"
#include "smc/tree_io.hpp"
