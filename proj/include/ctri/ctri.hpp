#pragma once

#include "algo_a1.hpp"
#include "algo_a2.hpp"
#include "algo_params.hpp"
#include "algo_sub_a.hpp"
#include "bits.hpp"
#include "bitset.hpp"
#include "compose.hpp"
#include "congest.hpp"
#include "edge_list.hpp"
#include "errors.hpp"
#include "framing.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "hash_family.hpp"
#include "lemmas.hpp"
#include "rng.hpp"
