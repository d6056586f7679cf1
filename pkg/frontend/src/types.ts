/** Shapes of the mealcarbon HTTP API payloads the UI consumes. */

export type Source = 'BONSAI' | 'AGRIBALYSE' | 'BIG_CLIMATE';

export interface Meta {
  countries: string[];
  regions: Record<string, string[]>;
  sources: Source[];
}

export interface ParsedIngredient {
  name: string;
  grams: number;
  provenance: string;
}

export interface SessionCreated {
  session_id: string;
  ingredients: ParsedIngredient[];
  notes: string[];
}

export interface Candidate {
  ingredient: string;
  product_id: string;
  source: Source;
  name: string;
  similarity: number;
  has_target_country_data: boolean;
}

export interface CandidatesResponse {
  session_id: string;
  stage: string;
  candidates: Record<string, Candidate[]>;
}

export interface IngredientImpact {
  ingredient: string;
  grams: number;
  min: number;
  max: number;
  midpoint: number;
  sources: string[];
  unmatched: boolean;
  notes: string[];
}

export interface CookingImpact {
  required: boolean;
  method: string;
  duration_min: number;
  temperature_c: number | null;
  min: number;
  max: number;
  midpoint: number;
}

export interface Equivalence {
  id: string;
  label: string;
  count: number;
  phrase: string;
}

export interface VisualizationData {
  ingredients: string[];
  impacts: number[];
}

export interface Assessment {
  target_country: string;
  ingredient_impacts: IngredientImpact[];
  cooking: CookingImpact;
  total_min: number;
  total_max: number;
  total_avg: number;
  equivalences: Equivalence[];
  visualization: VisualizationData | null;
  notes: string[];
}

export interface AssessmentResponse {
  session_id: string;
  assessment: Assessment;
  report: string;
  visualization: VisualizationData;
}

export interface ChatResponse {
  answer: string;
}
