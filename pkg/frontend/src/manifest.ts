// Manifest schema and structural validation for synthpages corpora.
//
// The manifest format is the common detection-dataset JSON layout; the
// checks here guard exactly the properties a training pipeline relies on:
// the nine fixed categories, id uniqueness, referential integrity, and
// boxes that stay inside their page.

import * as fs from "fs";
import { z } from "zod";

export const CLASS_LABELS = [
  "abstract",
  "algorithm",
  "author",
  "body-text",
  "caption",
  "equation",
  "figure",
  "table",
  "title",
] as const;

const ImageRecord = z
  .object({
    id: z.number().int(),
    file_name: z.string(),
    width: z.number().int().positive(),
    height: z.number().int().positive(),
  })
  .loose();

const AnnotationRecord = z
  .object({
    id: z.number().int(),
    image_id: z.number().int(),
    category_id: z.number().int(),
    bbox: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  })
  .loose();

const CategoryRecord = z.object({ id: z.number().int(), name: z.string() }).loose();

export const ManifestSchema = z
  .object({
    info: z.object({ seed: z.number(), profile: z.string() }).loose(),
    images: z.array(ImageRecord),
    annotations: z.array(AnnotationRecord),
    categories: z.array(CategoryRecord),
  })
  .loose();

export type Manifest = z.infer<typeof ManifestSchema>;

export interface RuleResult {
  id: string;
  pass: boolean;
  detail: string;
}

export interface SchemaReport {
  pass: boolean;
  rules: RuleResult[];
}

export function loadManifest(path: string): Manifest {
  const raw = JSON.parse(fs.readFileSync(path, "utf-8"));
  return ManifestSchema.parse(raw);
}

export function validateManifest(manifest: Manifest): SchemaReport {
  const rules: RuleResult[] = [];
  const rule = (id: string, pass: boolean, detail: string) =>
    rules.push({ id, pass, detail });

  // the nine classes with stable ids 0..8
  const expected = CLASS_LABELS.map((name, id) => ({ id, name }));
  const got = [...manifest.categories].sort((a, b) => a.id - b.id);
  const categoriesOk =
    got.length === 9 &&
    got.every((c, i) => c.id === expected[i].id && c.name === expected[i].name);
  rule(
    "categories-nine-classes",
    categoriesOk,
    categoriesOk ? "9 categories, ids 0-8" : `got ${JSON.stringify(got)}`
  );

  const imageIds = manifest.images.map((im) => im.id);
  const imageIdSet = new Set(imageIds);
  rule(
    "image-ids-unique",
    imageIdSet.size === imageIds.length,
    `${imageIds.length} images, ${imageIdSet.size} distinct ids`
  );

  const annIds = manifest.annotations.map((a) => a.id);
  rule(
    "annotation-ids-unique",
    new Set(annIds).size === annIds.length,
    `${annIds.length} annotations, ${new Set(annIds).size} distinct ids`
  );

  const knownCategories = new Set(manifest.categories.map((c) => c.id));
  const badCategory = manifest.annotations.filter(
    (a) => !knownCategories.has(a.category_id)
  );
  rule(
    "annotation-category-ref",
    badCategory.length === 0,
    badCategory.length === 0
      ? "all category ids known"
      : `unknown category ids: ${[...new Set(badCategory.map((a) => a.category_id))].join(", ")}`
  );

  const orphan = manifest.annotations.filter((a) => !imageIdSet.has(a.image_id));
  rule(
    "annotation-image-ref",
    orphan.length === 0,
    orphan.length === 0
      ? "all annotations reference an image"
      : `${orphan.length} annotations reference missing images`
  );

  const dims = new Map(manifest.images.map((im) => [im.id, im]));
  const outOfBounds = manifest.annotations.filter((a) => {
    const im = dims.get(a.image_id);
    if (!im) return false; // covered by annotation-image-ref
    const [x, y, w, h] = a.bbox;
    return x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > im.width || y + h > im.height;
  });
  rule(
    "bbox-within-image",
    outOfBounds.length === 0,
    outOfBounds.length === 0
      ? "all boxes inside their page"
      : `${outOfBounds.length} boxes out of bounds (first: annotation ${outOfBounds[0].id})`
  );

  // provenance cross-check: the info block must carry a reproducible seed
  const seedOk = Number.isInteger(manifest.info.seed);
  rule(
    "provenance-seed",
    seedOk,
    seedOk ? `seed ${manifest.info.seed}` : "info.seed missing or non-integer"
  );

  return { pass: rules.every((r) => r.pass), rules };
}
