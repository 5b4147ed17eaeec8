export {
  VERSION,
  openGenerator,
  closeGenerator,
  BoundGenerator,
  type AugmentedElement,
  type Batch,
  type DictSpec,
  type GeneratorConfig,
  type GeneratorMeta,
  type Trace,
  type TraceMiss,
  type TraceRecord,
} from "./generator.js";
