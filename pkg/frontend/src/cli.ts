#!/usr/bin/env node
/** Command line: `train --pairs DIR --stage near|mid --out CKPT` and
 * `infer --ckpt CKPT --input IN --output OUT --stage near|mid`. */
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { DEFAULT_CONFIG, GanConfig } from './config';
import { Stage } from './data';
import { inferCommand } from './infer';
import { trainCommand } from './train';

async function main(): Promise<void> {
  await yargs(hideBin(process.argv))
    .command(
      'train',
      'Train the conditional GAN on extracted pairs',
      y => y
        .option('pairs', { type: 'string', demandOption: true,
                           describe: 'directory of training pairs' })
        .option('stage', { choices: ['near', 'mid'] as const, demandOption: true })
        .option('out', { type: 'string', demandOption: true,
                         describe: 'checkpoint output directory' })
        .option('steps', { type: 'number', default: DEFAULT_CONFIG.steps })
        .option('image-size', { type: 'number', default: DEFAULT_CONFIG.imageSize })
        .option('lambda-l1', { type: 'number', default: DEFAULT_CONFIG.lambdaL1 })
        .option('learning-rate', { type: 'number',
                                   default: DEFAULT_CONFIG.learningRate })
        .option('batch-size', { type: 'number', default: DEFAULT_CONFIG.batchSize })
        .option('seed', { type: 'number', default: DEFAULT_CONFIG.seed }),
      async argv => {
        const config: GanConfig = {
          ...DEFAULT_CONFIG,
          steps: argv.steps,
          imageSize: argv['image-size'],
          lambdaL1: argv['lambda-l1'],
          learningRate: argv['learning-rate'],
          batchSize: argv['batch-size'],
          seed: argv.seed,
        };
        const result = await trainCommand(argv.pairs, argv.stage as Stage,
                                          argv.out, config);
        const last = result.log[result.log.length - 1];
        console.log(`trained ${result.log.length} steps; ` +
                    `final l1=${last.l1Loss.toFixed(4)}; ` +
                    `checkpoint in ${argv.out}`);
      })
    .command(
      'infer',
      'Generate a 256x256 output image from a checkpoint',
      y => y
        .option('ckpt', { type: 'string', demandOption: true })
        .option('input', { type: 'string', demandOption: true })
        .option('output', { type: 'string', demandOption: true })
        .option('stage', { type: 'string', default: '' }),
      async argv => {
        await inferCommand(argv.ckpt, argv.input, argv.output, argv.stage);
      })
    .demandCommand(1)
    .strict()
    .parseAsync();
}

main().catch(err => {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
});
